from .config import *
from .targets import *
from .trainer import *
from .successor import *
