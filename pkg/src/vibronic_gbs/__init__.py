from .config import ConfigError, RunConfig, load_run_config
from .factors import DomainError, PoleError, normalization_constant, single_mode_factors
from .fock import CutoffExceededError, fock_amplitudes, gaussian_fock_amplitude
from .gauss import (
    BlochMessiahForm,
    BogoliubovTransform,
    InvariantViolationError,
    SingularDuschinskyError,
    bloch_messiah,
    bogoliubov_from_duschinsky,
    doktorov_factorize,
)
from .linelist import LineListError, read_line_list, write_line_list
from .models import (
    DimensionMismatchError,
    InputError,
    MoleculeSpec,
    NumericalError,
    Order,
    TdmExpansion,
    ValidationError,
    VibronicError,
)
from .molecule import UnitError
from .molfile import ParseError, UnknownDatasetError, list_datasets, load_dataset, parse_molecule
from .oracle import NonConvergenceError, truncated_oracle_state
from .spectrum import (
    MassExcessError,
    SpectralProfile,
    aux_profile,
    broaden,
    condon_profile,
    device_settings,
    error_sweep,
    exact_profile,
    noncondon_profile,
    sample_profile,
    total_mass,
)

__all__ = [
    "VibronicError",
    "InputError",
    "NumericalError",
    "ValidationError",
    "DimensionMismatchError",
    "UnitError",
    "ParseError",
    "UnknownDatasetError",
    "ConfigError",
    "LineListError",
    "SingularDuschinskyError",
    "InvariantViolationError",
    "PoleError",
    "DomainError",
    "CutoffExceededError",
    "NonConvergenceError",
    "MassExcessError",
    "MoleculeSpec",
    "TdmExpansion",
    "Order",
    "RunConfig",
    "load_run_config",
    "BogoliubovTransform",
    "BlochMessiahForm",
    "bogoliubov_from_duschinsky",
    "doktorov_factorize",
    "bloch_messiah",
    "single_mode_factors",
    "normalization_constant",
    "fock_amplitudes",
    "gaussian_fock_amplitude",
    "truncated_oracle_state",
    "SpectralProfile",
    "condon_profile",
    "aux_profile",
    "noncondon_profile",
    "exact_profile",
    "error_sweep",
    "broaden",
    "sample_profile",
    "total_mass",
    "device_settings",
    "parse_molecule",
    "load_dataset",
    "list_datasets",
    "read_line_list",
    "write_line_list",
]
