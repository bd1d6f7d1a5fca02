from dataclasses import asdict, dataclass, fields, replace
from logging import getLogger
from os import getenv

LOGGER = getLogger(__name__)

ENV_PREFIX = "RIGIDITY_"


@dataclass(frozen=True)
class Settings:
    """Numeric caps shared by the library and the command line.

    Every field can be overridden with an environment variable named
    ``RIGIDITY_<FIELD>`` (upper case), typically through a ``.env`` file.
    """

    scan_budget: int = 2**22
    probe: int = 512
    iso_cap: int = 12
    search_cap: int = 300
    node_budget: int = 10**7
    orbit_cap: int = 10**6
    closure_degree_cap: int = 8
    relation_degree_cap: int = 6
    powerset_degree_cap: int = 12
    relation_candidate_cap: int = 2**20
    attempts: int = 12

    @classmethod
    def from_env(cls) -> "Settings":
        overrides = {}
        for field in fields(cls):
            raw = getenv(f"{ENV_PREFIX}{field.name.upper()}")
            if raw is None or raw == "":
                continue
            try:
                overrides[field.name] = int(raw)
            except ValueError:
                LOGGER.warning(f"Ignoring non-integer {ENV_PREFIX}{field.name.upper()}={raw!r}")
        return cls(**overrides)

    def updated(self, **overrides: int | None) -> "Settings":
        """Return a copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_json(self) -> dict:
        return asdict(self)


DEFAULTS = Settings()
