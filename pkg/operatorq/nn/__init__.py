from .mlp import *
from .optim import *
from .checkpoint import *
