"""Dense packings of congruent disks in arbitrary planar domains.

Disk centres repel each other and their mirror images through the nearest
boundary point; the repulsion exponent is raised stage by stage until the
configuration behaves like hard disks.
"""

from .geometry import DomainSpec, Family
from .packer import PackingResult, Schedule, multi_trial, pack, warm_start_sweep

__all__ = ["DomainSpec", "Family", "PackingResult", "Schedule", "multi_trial", "pack", "warm_start_sweep"]
