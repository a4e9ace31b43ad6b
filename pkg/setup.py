from setuptools import setup, find_packages
import os

# the README doubles as the long description
def read(fname):
  with open(os.path.join(os.path.dirname(__file__), fname)) as stream:
    return stream.read()

setup(
  name='operatorq',
  version='0.1',
  description='Operator deep Q-learning: zero-shot reward transfer on tabular MDPs',
  long_description=read('README.md'),
  long_description_content_type='text/markdown',
  license='MIT',
  packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
  python_requires='>=3.7',
  install_requires=[
    'numpy >= 1.17',
    'pandas >= 1.0',
    'PyYaml >= 5.1'
  ],
  extras_require={
    'tests': ['pytest >= 6.0']
  },
  entry_points={
    "console_scripts": [
      "operatorq = operatorq:main"
    ]
  }
)
