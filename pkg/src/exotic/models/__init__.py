from .config import OrbitConfig as OrbitConfig
from .custom_types import Point as Point
from .generators import (
    GeneratorFile as GeneratorFile,
    GeneratorSet as GeneratorSet,
    load_generator_file as load_generator_file,
    parse_generator_file as parse_generator_file,
)
from .quad import QuadGroupData as QuadGroupData
from .reports import (
    AccumulationReport as AccumulationReport,
    CheckResult as CheckResult,
    ClosureReport as ClosureReport,
    LimitSetSummary as LimitSetSummary,
    RunReport as RunReport,
    TangencyReport as TangencyReport,
)
