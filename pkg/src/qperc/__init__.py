"""Bond percolation on the hypercube: generation, components, expansion,
random walks, tree decompositions and long paths/cycles/minors."""
from .errors import CapExceededError, ConfigError, ConvergenceError, DisconnectedError, QpercError
from .hypercube import GenerationParams, HypercubeSubgraph, generate, generate_sprinkled

__version__ = "0.1.0"
