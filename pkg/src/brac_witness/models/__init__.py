# package marker for models
from .payoff import PayoffConfig, PcritRecord
from .task import TaskParams
