FORMAT_VERSION = 1

DEFAULT_GAMMA = 0.99

# Adam
LEARNING_RATE = 0.001
BETA1 = 0.9
BETA2 = 0.999
ADAM_EPSILON = 1e-8

BATCH_SIZE = 256
TARGET_RATE = 0.005
REFERENCE_POINTS = 128
MAXOUT_HEADS = 8
HIDDEN_SIZES = [64, 64]
EMBED_DIM = 32
OUTPUT_INIT_SCALE = 0.01

EVAL_EVERY = 500
EVALUATION_STEPS = 20000
OPTIMIZATION_STEPS = 30000

N_TRAIN_REWARDS = 32
N_TEST_REWARDS = 16
N_SEEDS = 10

EPISODE_HORIZON = 200
FINAL_BUFFER_PROBABILITIES = [1.0, 0.3, 0.1]
RIDGE = 1e-6

MODES = ['evaluation', 'optimization']
ACTIVATIONS = ['relu', 'tanh']
SF_DESIGN = 'successor-feature'
