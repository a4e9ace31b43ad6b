# import all supported reward families
from .goal_cell import GoalCell
from .feature_linear import FeatureLinear, gaussian_features
from .rbf_bump import RbfBump
