"""
test_matrix.py

Harness configuration: the test matrix a verification run sweeps over.

The configuration is INI-style text with the sections [grid], [operators],
[ati], [weights], [functions], [sweeps] and [assertions]. Every key is
optional; unknown sections and keys are rejected so a typo never silently falls
back to a default.

Key tasks:
- parse config text into frozen dataclasses, reporting the line and field of
  every error through ConfigError
- apply command-line overrides (seed, level)
- hash the effective configuration for golden-cap lookup

Created: July 30, 2025
"""

import configparser
import hashlib
import json
import logging
import re
from dataclasses import asdict, dataclass, field, replace

from grid.cube_family import FAMILY_KINDS
from grid.errors import ConfigError, HarmonicToolkitError
from kernels.approximation import ATI_KINDS
from kernels.operators import OPERATOR_KINDS
from decomp.calderon_zygmund import BAD_PART_MODES

logger = logging.getLogger(__name__)

SECTIONS = ("grid", "operators", "ati", "weights", "functions", "sweeps", "assertions")

WEIGHT_KINDS = ("constant", "power", "array")
GENERATORS = ("one-cell", "random-sign", "haar", "bump", "random-positive")

DEFAULT_GOLDEN_DIR = "pipeline/tests/golden"


@dataclass(frozen=True)
class GridConfig:
    n: int = 1
    level: int = 8
    periodic: bool = False
    family: str = "auto"
    inner_family: str = "dyadic"
    bad_parts: str = "restriction"


@dataclass(frozen=True)
class OperatorConfig:
    t1: str = "hilbert"
    t2: str = "hilbert"
    riesz_component: int = 1
    rough_omega: tuple = ()
    matrix_path: str = ""
    size_condition: bool = True


@dataclass(frozen=True)
class AtIConfig:
    family: str = "heat"
    s: float = 2.0
    c1: float = 2.0
    c2: float = 2.0
    alpha: float = 1.0
    eta: float = 1.0
    t_sweep: tuple = ()


@dataclass(frozen=True)
class WeightConfig:
    """One named weight: kind plus its numeric arguments."""

    name: str
    kind: str
    args: tuple


@dataclass(frozen=True)
class SweepConfig:
    p: tuple = (1.5, 2.0, 3.0)
    q: tuple = (2.0,)
    lambdas: tuple = ()
    eps: tuple = (1.0, 0.5, 0.25)
    k: tuple = (1, 2, 3)
    beta: tuple = (0.0, 1.0)


@dataclass(frozen=True)
class AssertionConfig:
    golden_dir: str = DEFAULT_GOLDEN_DIR
    headroom: float = 0.25


def _default_weights():
    return (WeightConfig("unweighted", "constant", (1.0,)),)


@dataclass(frozen=True)
class TestMatrix:
    """
    Full harness configuration.

    Attributes:
        grid, operators, ati, sweeps, assertions: Section dataclasses
        weights (tuple[WeightConfig, ...]): Named weight specs, in file order
        generators (tuple[str, ...]): Input-function generators
        random_count (int): Draws per random generator
        seed (int): RNG seed recorded in every report row
    """

    __test__ = False

    grid: GridConfig = field(default_factory=GridConfig)
    operators: OperatorConfig = field(default_factory=OperatorConfig)
    ati: AtIConfig = field(default_factory=AtIConfig)
    weights: tuple = field(default_factory=_default_weights)
    generators: tuple = ("one-cell", "random-sign", "haar", "bump")
    random_count: int = 1
    sweeps: SweepConfig = field(default_factory=SweepConfig)
    assertions: AssertionConfig = field(default_factory=AssertionConfig)
    seed: int = 0

    def with_overrides(self, seed=None, level=None):
        """Copy with the CLI overrides applied (None leaves a value untouched)."""
        out = self
        if seed is not None:
            out = replace(out, seed=int(seed))
        if level is not None:
            if level < 1:
                raise ConfigError(f"level must be >= 1, got {level}", field="--level")
            out = replace(out, grid=replace(out.grid, level=int(level)))
        return out

    @property
    def family(self):
        if self.grid.family == "auto":
            return "all" if self.grid.n == 1 else "power2"
        return self.grid.family


def config_hash(matrix):
    """First 12 hex digits of the SHA-256 of the canonical JSON of the configuration."""
    payload = json.dumps(asdict(matrix), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


# --- parsing --------------------------------------------------------------------


_KNOWN_KEYS = {
    "grid": {"n", "level", "periodic", "family", "inner_family", "bad_parts"},
    "operators": {"t1", "t2", "riesz_component", "rough_omega", "matrix_path", "size_condition"},
    "ati": {"family", "s", "c1", "c2", "alpha", "eta", "t_sweep"},
    "functions": {"generators", "random_count"},
    "sweeps": {"p", "q", "lambda", "eps", "k", "beta", "seed"},
    "assertions": {"golden_dir", "headroom"},
}


class _Reader:
    """Typed access to a parsed config that knows where every key lives."""

    def __init__(self, parser, text):
        self.parser = parser
        self.lines = text.splitlines()

    def line_of(self, section, key=None):
        current = None
        for number, raw in enumerate(self.lines, start=1):
            stripped = raw.strip()
            header = re.fullmatch(r"\[([^\]]+)\]", stripped)
            if header:
                current = header.group(1).strip().lower()
                if key is None and current == section:
                    return number
                continue
            if current == section and key is not None:
                name = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
                if name == key:
                    return number
        return None

    def fail(self, section, key, message):
        raise ConfigError(message, line=self.line_of(section, key), field=f"[{section}] {key}")

    def raw(self, section, key):
        if self.parser.has_section(section) and self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        return None

    def get(self, section, key, convert, default):
        value = self.raw(section, key)
        if value is None or value == "":
            return default
        try:
            return convert(value)
        except (ValueError, HarmonicToolkitError) as err:
            self.fail(section, key, f"cannot read {value!r}: {err}")

    def choice(self, section, key, options, default):
        value = self.get(section, key, str, default)
        if value not in options:
            self.fail(section, key, f"{value!r} is not one of {', '.join(options)}")
        return value

    def boolean(self, section, key, default):
        value = self.raw(section, key)
        if value is None or value == "":
            return default
        lowered = value.lower()
        if lowered in configparser.ConfigParser.BOOLEAN_STATES:
            return configparser.ConfigParser.BOOLEAN_STATES[lowered]
        self.fail(section, key, f"{value!r} is not a boolean")


def _floats(text):
    return tuple(float(v) for v in re.split(r"[,\s]+", text.strip()) if v)


def _ints(text):
    return tuple(int(v) for v in re.split(r"[,\s]+", text.strip()) if v)


def _names(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _parse_weight(reader, name, text):
    parts = text.split(None, 1)
    kind = parts[0].lower() if parts else ""
    if kind not in WEIGHT_KINDS:
        reader.fail("weights", name, f"weight kind must be one of {', '.join(WEIGHT_KINDS)}")
    rest = parts[1] if len(parts) > 1 else ""
    try:
        args = _floats(rest)
    except ValueError:
        reader.fail("weights", name, f"cannot read weight arguments {rest!r}")
    if kind == "constant" and (len(args) != 1 or args[0] <= 0):
        reader.fail("weights", name, "constant weights take one positive value")
    if kind == "power" and len(args) not in (1, 2):
        reader.fail("weights", name, "power weights take an exponent and an optional centre")
    if kind == "array" and (not args or min(args) < 0):
        reader.fail("weights", name, "array weights take non-negative cell values")
    return WeightConfig(name, kind, args)


def _check_range(reader, section, key, values, low, high, low_open=True, high_open=False):
    for v in values:
        above = v > low if low_open else v >= low
        below = v < high if high_open else v <= high
        if not (above and below):
            reader.fail(section, key, f"value {v:g} outside the admissible range")


def parse_test_matrix(text, source="<config>"):
    """
    Parse configuration text.

    Parameters:
        text (str): INI-style configuration
        source (str): Name used in log messages

    Returns:
        TestMatrix

    Raises:
        ConfigError: On syntax errors, unknown sections or keys, and invalid values
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as err:
        raise ConfigError("entries must follow a [section] header", line=err.lineno) from err
    except configparser.ParsingError as err:
        line = err.errors[0][0] if err.errors else None
        raise ConfigError("malformed line", line=line) from err
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as err:
        raise ConfigError(str(err.message).split(":")[-1].strip(), line=err.lineno) from err

    reader = _Reader(parser, text)
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]", line=reader.line_of(section))
        if section == "weights":
            continue
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                reader.fail(section, key, "unknown key")

    n = reader.get("grid", "n", int, 1)
    if n not in (1, 2):
        reader.fail("grid", "n", "dimension must be 1 or 2")
    level = reader.get("grid", "level", int, 8)
    if level < 1 or (n == 2 and level > 6) or level > 12:
        reader.fail("grid", "level", "level must lie in 1..12 (1..6 for n = 2)")
    grid = GridConfig(
        n=n,
        level=level,
        periodic=reader.boolean("grid", "periodic", False),
        family=reader.choice("grid", "family", ("auto",) + FAMILY_KINDS, "auto"),
        inner_family=reader.choice("grid", "inner_family", FAMILY_KINDS, "dyadic"),
        bad_parts=reader.choice("grid", "bad_parts", BAD_PART_MODES, "restriction"),
    )

    kinds = OPERATOR_KINDS
    operators = OperatorConfig(
        t1=reader.choice("operators", "t1", kinds, "hilbert" if n == 1 else "riesz2d"),
        t2=reader.choice("operators", "t2", kinds, "hilbert" if n == 1 else "riesz2d"),
        riesz_component=reader.get("operators", "riesz_component", int, 1),
        rough_omega=reader.get("operators", "rough_omega", _floats, ()),
        matrix_path=reader.get("operators", "matrix_path", str, ""),
        size_condition=reader.boolean("operators", "size_condition", True),
    )
    for key in ("t1", "t2"):
        kind = getattr(operators, key)
        if kind == "hilbert" and n != 1:
            reader.fail("operators", key, "the Hilbert kernel lives on n = 1")
        if kind == "riesz2d" and n != 2:
            reader.fail("operators", key, "the Riesz kernel lives on n = 2")
        if kind == "matrix" and not operators.matrix_path:
            reader.fail("operators", key, "kind 'matrix' needs matrix_path")
    if operators.riesz_component not in (1, 2):
        reader.fail("operators", "riesz_component", "component must be 1 or 2")

    ati = AtIConfig(
        family=reader.choice("ati", "family", ATI_KINDS, "heat"),
        s=reader.get("ati", "s", float, 2.0),
        c1=reader.get("ati", "c1", float, 2.0),
        c2=reader.get("ati", "c2", float, 2.0),
        alpha=reader.get("ati", "alpha", float, 1.0),
        eta=reader.get("ati", "eta", float, 1.0),
        t_sweep=reader.get("ati", "t_sweep", lambda v: () if v == "auto" else _floats(v), ()),
    )
    _check_range(reader, "ati", "alpha", (ati.alpha,), 0.0, 1.0)
    _check_range(reader, "ati", "t_sweep", ati.t_sweep, 0.0, float("inf"), high_open=True)
    if ati.family == "heat" and ati.s != 2:
        reader.fail("ati", "s", "the heat family scales with s = 2")

    weights = _default_weights()
    if parser.has_section("weights") and parser.options("weights"):
        weights = tuple(_parse_weight(reader, name, parser.get("weights", name)) for name in parser.options("weights"))

    generators = reader.get("functions", "generators", _names, TestMatrix.generators)
    for name in generators:
        if name not in GENERATORS:
            reader.fail("functions", "generators", f"unknown generator {name!r}")
    random_count = reader.get("functions", "random_count", int, 1)
    if random_count < 1:
        reader.fail("functions", "random_count", "at least one draw is needed")

    sweeps = SweepConfig(
        p=reader.get("sweeps", "p", _floats, SweepConfig.p),
        q=reader.get("sweeps", "q", _floats, SweepConfig.q),
        lambdas=reader.get("sweeps", "lambda", lambda v: () if v == "auto" else _floats(v), ()),
        eps=reader.get("sweeps", "eps", _floats, SweepConfig.eps),
        k=reader.get("sweeps", "k", _ints, SweepConfig.k),
        beta=reader.get("sweeps", "beta", _floats, SweepConfig.beta),
    )
    _check_range(reader, "sweeps", "p", sweeps.p, 1.0, float("inf"), high_open=True)
    _check_range(reader, "sweeps", "q", sweeps.q, 1.0, 2.0)
    _check_range(reader, "sweeps", "lambda", sweeps.lambdas, 0.0, float("inf"), high_open=True)
    _check_range(reader, "sweeps", "eps", sweeps.eps, 0.0, 1.0)
    _check_range(reader, "sweeps", "k", sweeps.k, 0, 3, low_open=False)
    _check_range(reader, "sweeps", "beta", sweeps.beta, 0.0, float("inf"), low_open=False, high_open=True)
    if 0 in sweeps.k:
        reader.fail("sweeps", "k", "compositions need at least one operator")

    assertions = AssertionConfig(
        golden_dir=reader.get("assertions", "golden_dir", str, DEFAULT_GOLDEN_DIR),
        headroom=reader.get("assertions", "headroom", float, 0.25),
    )
    if assertions.headroom < 0:
        reader.fail("assertions", "headroom", "headroom must be >= 0")

    matrix = TestMatrix(
        grid=grid,
        operators=operators,
        ati=ati,
        weights=weights,
        generators=generators,
        random_count=random_count,
        sweeps=sweeps,
        assertions=assertions,
        seed=reader.get("sweeps", "seed", int, 0),
    )
    logger.debug("parsed %s: n=%d, L=%d, %d weight(s)", source, n, level, len(weights))
    return matrix
