"""Real eight-component formulation of the Dirac field: algebra, solutions, conserved
quantities, electromagnetic coupling and lattice evolution."""
import json
from importlib import resources

from .algebra import etas, gammas, n_matrix, s_matrix, verify_algebra
from .free_field import PlaneWaveParams, plane_wave_phi
from .representations import from_dirac, to_dirac

__version__ = "0.1.0"

SUBCOMMANDS = ("verify-algebra", "planewave", "conserved", "maxwell-check", "interaction-check",
               "hydrogen", "evolve", "transform")


def load_schema(subcommand: str) -> dict:
    """JSON schema shipped for a CLI subcommand."""
    if subcommand not in SUBCOMMANDS:
        raise KeyError(subcommand)
    text = resources.files(__name__).joinpath("schemas", f"{subcommand}.schema.json").read_text("utf-8")
    return json.loads(text)


__all__ = ["etas", "gammas", "n_matrix", "s_matrix", "verify_algebra", "PlaneWaveParams",
           "plane_wave_phi", "from_dirac", "to_dirac", "load_schema", "SUBCOMMANDS"]
