"""Certified global sensitivity analysis with a reduced basis metamodel.

certsobol estimates first-order Sobol indices of the viscous Burgers model
through a POD reduced basis whose outputs carry certified error bounds:

- a semi-implicit finite-difference solver of the full model
- an offline/online reduced basis with a posteriori error bounds
- pick-freeze estimation with deterministic bounds on the full-model estimator
  and bootstrap confidence intervals covering both error sources
- a precision model choosing the cheapest sample size and basis size

Basic Usage:
```python linenums="1"
from certsobol import RunConfig, run_offline, run_sensitivity, reduced_evaluator

config = RunConfig(N=1000)
basis = run_offline(config).basis
result = run_sensitivity(config, reduced_evaluator(config, basis))
print(result.table)
```

Copyright 2025 Visecy

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

from .budget import BudgetSolution, PrecisionModel, fit_precision_model, optimize_budget
from .config import RunConfig, load_config
from .errors import (
    BasisFormatError,
    BoundBlowup,
    CertSobolError,
    ConfigError,
    DegenerateVariance,
    DenominatorStraddlesZero,
    FitFailed,
    InfeasibleRounding,
    NumericalError,
    RankDeficient,
    SolverDiverged,
)
from .experiments import full_evaluator, reduced_evaluator, run_offline, run_sensitivity
from .model_full import Discretization, ParameterPoint, solve_full
from .reduced_basis import ReducedBasis, build_basis, collect_snapshots, output_with_bound
from .sobol import CertifiedPairs, bootstrap_combined_ci, bound_sobol, estimate_sobol, generate_design
from .version import __version__  # noqa: F401

__all__ = [
    "BasisFormatError",
    "BoundBlowup",
    "BudgetSolution",
    "CertSobolError",
    "CertifiedPairs",
    "ConfigError",
    "DegenerateVariance",
    "DenominatorStraddlesZero",
    "Discretization",
    "FitFailed",
    "InfeasibleRounding",
    "NumericalError",
    "ParameterPoint",
    "PrecisionModel",
    "RankDeficient",
    "ReducedBasis",
    "RunConfig",
    "SolverDiverged",
    "bootstrap_combined_ci",
    "bound_sobol",
    "build_basis",
    "collect_snapshots",
    "estimate_sobol",
    "fit_precision_model",
    "full_evaluator",
    "generate_design",
    "load_config",
    "optimize_budget",
    "output_with_bound",
    "reduced_evaluator",
    "run_offline",
    "run_sensitivity",
    "solve_full",
]
