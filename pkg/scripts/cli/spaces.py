"""
Space definitions: one JSON file per Köthe space.

A definition names the space, its index set, the weights (a builtin family
or DSL source), optional declared flags and analysis settings:

    {
        "name": "matrix_example",
        "definition": {"builtin": "matrix_example"},
        "analysis": {"depth": 10000, "level_budget": 8},
        "expected": {"dg": "2", "db": "2", "wdg": "1", "wdb": "1"}
    }

DSL definitions use {"expr": "k^i"} (level parameter k) or
{"levels": ["1", "i", "i^2"]}. The "expected" block is only read by the
golden catalog checks.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from workbench.config import CONFIG_DIR, resolve_budget, resolve_depth
from workbench.errors import ConfigError
from workbench.verdict import Verdict
from weights.axioms import axioms_check, check_declared_flags
from weights.catalog import make_builtin
from weights.family import FamilyFlags, WeightFamily, family_from_dict
from weights.index_set import IndexKind

logger = logging.getLogger(__name__)

SPACES_DIR = CONFIG_DIR / "spaces"
ANALYSIS_KEYS = ("depth", "level_budget", "epsilon")


@dataclass(frozen=True)
class SpaceConfig:
    """One parsed space definition."""

    name: str
    index_set: Any
    definition: Dict[str, Any]
    flags: Optional[Dict[str, Any]] = None
    analysis: Dict[str, Any] = field(default_factory=dict)
    expected: Optional[Dict[str, Any]] = None
    source: Optional[Path] = None

    def family(self) -> WeightFamily:
        """
        Build the weight family.

        Raises:
            ConfigError: unknown builtin, bad parameters or bad DSL source
        """
        builtin = self.definition.get("builtin")
        if builtin is not None:
            if isinstance(builtin, str):
                family = make_builtin(builtin)
            else:
                family = make_builtin(builtin["family_id"], builtin.get("params") or {})
            if self.flags is not None and FamilyFlags.from_dict(self.flags) != family.flags:
                logger.warning("%s: declared flags differ from the builtin's; using the builtin's",
                               self.name)
            return family
        data = {"name": self.name, "index_set": self.index_set, "flags": self.flags or {}}
        data.update(self.definition)
        return family_from_dict(data)

    def settings(self, depth: Optional[int] = None, level_budget: Optional[int] = None,
                 epsilon: Optional[float] = None) -> Dict[str, Any]:
        """Analysis settings; explicit arguments win over the file's values."""
        overrides = {"depth": depth, "level_budget": level_budget, "epsilon": epsilon}
        return {key: overrides[key] if overrides[key] is not None else self.analysis.get(key)
                for key in ANALYSIS_KEYS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: Optional[Path] = None) -> "SpaceConfig":
        """
        Raises:
            ConfigError: missing name or definition, unknown analysis keys
        """
        if not isinstance(data, dict):
            raise ConfigError(f"{source or 'space'}: expected a JSON object")
        name = data.get("name")
        definition = data.get("definition")
        if not name or not isinstance(name, str):
            raise ConfigError(f"{source or 'space'}: missing name")
        if not isinstance(definition, dict) or not ({"builtin", "expr", "levels"} & set(definition)):
            raise ConfigError(f"{name}: definition needs one of builtin, expr or levels")
        analysis = dict(data.get("analysis") or {})
        unknown = sorted(set(analysis) - set(ANALYSIS_KEYS))
        if unknown:
            raise ConfigError(f"{name}: unknown analysis keys {', '.join(unknown)}")
        return cls(
            name=name,
            index_set=data.get("index_set", "naturals"),
            definition=dict(definition),
            flags=data.get("flags"),
            analysis=analysis,
            expected=data.get("expected"),
            source=source,
        )


def load_space(path: Union[str, Path]) -> SpaceConfig:
    """
    Read one space definition.

    Raises:
        ConfigError: unreadable file, invalid JSON or invalid layout
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}")
    return SpaceConfig.from_dict(data, source=path)


@dataclass(frozen=True)
class ValidationResult:
    """Axioms verdict and declared-flag disagreements for one space."""

    family: WeightFamily
    axioms: Verdict
    flag_problems: List[str]

    @property
    def ok(self) -> bool:
        return not self.axioms.is_fails and not self.flag_problems

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.name,
            "axioms": self.axioms.to_dict(),
            "flag_problems": list(self.flag_problems),
            "flags": self.family.flags.to_dict(),
        }


def validate_space(space: SpaceConfig, depth: Optional[int] = None,
                   level_budget: Optional[int] = None) -> ValidationResult:
    """
    Parse the weights, check (P1)/(P2) on the prefix and compare declared
    flags with evaluation. Callers must not analyze a space whose result is
    not ok.
    """
    family = space.family()
    pairs = family.index_set.kind == IndexKind.NATURAL_PAIRS
    depth = resolve_depth(depth, pairs)
    axioms = axioms_check(family, depth, resolve_budget(level_budget))
    problems = check_declared_flags(family, depth, resolve_budget(level_budget))
    if axioms.is_unknown:
        logger.warning("%s: %s", space.name, axioms.reason)
    return ValidationResult(family, axioms, problems)


def require_valid(space: SpaceConfig, depth: Optional[int] = None,
                  level_budget: Optional[int] = None) -> WeightFamily:
    """
    The space's family after a successful validation.

    Raises:
        ConfigError: (P1) fails or a declared flag is contradicted
    """
    result = validate_space(space, depth, level_budget)
    if result.axioms.is_fails:
        raise ConfigError(f"{space.name}: {result.axioms.reason}")
    if result.flag_problems:
        raise ConfigError(f"{space.name}: declared flags contradicted: "
                          f"{'; '.join(result.flag_problems)}")
    return result.family


def golden_catalog(directory: Optional[Path] = None) -> List[SpaceConfig]:
    """The shipped example spaces with their expected profiles, in file-name order."""
    directory = Path(directory) if directory else SPACES_DIR
    return [load_space(path) for path in sorted(directory.glob("*.json"))]
