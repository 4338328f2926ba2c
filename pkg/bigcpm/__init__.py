# bigcpm - Cumulative probability models for large datasets
# Whole-data fitting, divide-and-combine, and outcome discretization

# Core fitting
from .core.link import LinkFamily, link_eval
from .core.data import Dataset, index_outcomes
from .core.model import FitOptions, CpmFit, fit_cpm, alpha_at
from .core.serializer import ResultSerializer
from .core.recorder import BenchRecorder

# Big-data approaches
from .combine.engine import CombinedFit, fit_divide_combine
from .discretize.binning import bin_equal_quantile
from .discretize.rounding import RoundingMode, RoundingScheme, choose_rounding

# Inference, comparison and simulation
from .analysis.inference import conditional_distribution, conditional_mean, conditional_median, predict
from .analysis.compare import Approach, ComparisonEngine, fit_approach
from .simulate.scenarios import ScenarioSpec, simulate_dataset, true_conditional

__all__ = [
    # Core fitting
    'LinkFamily',
    'link_eval',
    'Dataset',
    'index_outcomes',
    'FitOptions',
    'CpmFit',
    'fit_cpm',
    'alpha_at',
    'ResultSerializer',
    'BenchRecorder',

    # Big-data approaches
    'CombinedFit',
    'fit_divide_combine',
    'bin_equal_quantile',
    'RoundingMode',
    'RoundingScheme',
    'choose_rounding',

    # Inference, comparison and simulation
    'conditional_distribution',
    'conditional_mean',
    'conditional_median',
    'predict',
    'Approach',
    'ComparisonEngine',
    'fit_approach',
    'ScenarioSpec',
    'simulate_dataset',
    'true_conditional',
]

__version__ = "0.1.0"
