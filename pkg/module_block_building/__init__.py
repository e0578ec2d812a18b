# module_block_building/__init__.py

from .errors import (ConfigError, FifoGapError, InputFormatError, InstanceError,
                     InstanceTooLargeError, SandwichViolation)
from .model import (BlockParams, Packing, PackingKind, ProblemInstance, Transaction,
                    build_instance, instance_from_arrays)
from .packing import (ApproxCertificate, RelaxationSolution, exact_pack, exhaustive_pack,
                      fifo_pack, greedy_pack, permute, solve_relaxation)
from .bounds import (GapBounds, GapSoundnessReport, check_gap_soundness, compute_gap_bounds,
                     exact_expected_fifo)
