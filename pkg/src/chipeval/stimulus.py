"""Seeded constrained-random stimulus with a one-shot reset prefix.

The drive sequence asserts reset for the first `reset_cycles` cycles, then
deasserts it exactly once for the rest of the run; the paired MaskSchedule
tells the comparison engine to ignore outputs until the deassertion point.

Randomness comes from splitmix64 (Steele/Lea/Flood mixing constants
0x9e3779b97f4a7c15 / 0xbf58476d1ce4e5b9 / 0x94d049bb133111eb) so any
implementation of this tool reproduces byte-identical streams from the same
seed. Draw order is one value per non-clock, non-reset input port per cycle,
in declared port order; ports wider than 64 bits take ceil(width/64) draws,
least-significant word first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PlanInvalid, UnsupportedPort
from .interface import ModuleInterface, Port, PortDirection

MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit mixing generator (splitmix64)."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def bits(self, width: int) -> int:
        """Uniform value in [0, 2**width), LSW-first for width > 64."""
        value, shift = 0, 0
        while shift < width:
            value |= self.next() << shift
            shift += 64
        return value & ((1 << width) - 1)


def derive_seed(master_seed: int, *parts: str | int) -> int:
    """Stable per-case/per-sample seed: mix each part into the master.

    Strings are folded in FNV-1a style byte by byte, then passed through one
    splitmix64 round, so any worker computes the same seed for the same
    (master, parts) regardless of scheduling.
    """
    h = master_seed & MASK64
    for part in parts:
        if isinstance(part, int):
            data = part.to_bytes(8, "little", signed=False)
        else:
            data = part.encode("utf-8")
        for b in data:
            h = ((h ^ b) * 0x100000001B3) & MASK64
        h = SplitMix64(h).next()
    return h


@dataclass(frozen=True)
class StimulusPlan:
    seed: int = 0
    total_cycles: int = 1024
    reset_cycles: int = 20
    include_corners: bool = True

    def __post_init__(self):
        if self.total_cycles <= self.reset_cycles:
            raise PlanInvalid(
                f"total_cycles ({self.total_cycles}) must exceed "
                f"reset_cycles ({self.reset_cycles})"
            )
        if self.reset_cycles < 0 or self.total_cycles <= 0:
            raise PlanInvalid("cycle counts must be non-negative")


@dataclass(frozen=True)
class InputVector:
    cycle: int
    values: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class MaskSchedule:
    """Outputs at cycle c are compared iff c >= compare_from."""

    compare_from: int


def _check_ports(iface: ModuleInterface) -> None:
    for p in iface.ports:
        if p.direction is PortDirection.INOUT:
            raise UnsupportedPort(f"inout port {p.name!r} cannot be driven")


def corner_vectors(iface: ModuleInterface) -> list[dict[str, int]]:
    """Directed corner templates, one-hot across data ports.

    Per data port: all-zeros, all-ones, 1, MSB-only, then a walking-one sweep
    capped at 8 bit positions; each template is applied to one port while the
    others hold zero. Clock and reset ports are never part of a template (the
    reset line must stay deasserted once toggled).
    """
    _check_ports(iface)
    data_ports = iface.data_inputs()
    vectors = []
    for port in data_ports:
        w = port.width
        templates = [0, (1 << w) - 1, 1, 1 << (w - 1)]
        templates += [1 << i for i in range(min(w, 8))]
        for value in templates:
            vec = {p.name: 0 for p in data_ports}
            vec[port.name] = value
            vectors.append(vec)
    return vectors


def generate_stimuli(
    iface: ModuleInterface, plan: StimulusPlan
) -> tuple[list[InputVector], MaskSchedule]:
    """Build the full drive sequence and its comparison mask.

    Reset is driven asserted for cycles [0, reset_cycles) and deasserted from
    reset_cycles on -- one toggle for the whole trace. All other non-clock
    inputs are uniform random draws; with include_corners, the first cycles
    after the mask boundary carry the corner templates instead of draws
    (replacing, not extending, so the trace length stays total_cycles).
    """
    _check_ports(iface)
    rng = SplitMix64(plan.seed)
    reset = iface.reset
    assert_level = {True: 0, False: 1}
    corner_list = corner_vectors(iface) if plan.include_corners else []
    data_ports = iface.data_inputs()

    vectors: list[InputVector] = []
    for cycle in range(plan.total_cycles):
        corner_idx = cycle - plan.reset_cycles
        if 0 <= corner_idx < len(corner_list):
            values = dict(corner_list[corner_idx])
        else:
            values = {p.name: rng.bits(p.width) for p in data_ports}
        if reset is not None:
            if cycle < plan.reset_cycles:
                values[reset.name] = assert_level[reset.active_low]
            else:
                values[reset.name] = 1 - assert_level[reset.active_low]
        # restore declared port order
        ordered = {p.name: values[p.name] for p in iface.driven_inputs()}
        vectors.append(InputVector(cycle, ordered))
    return vectors, MaskSchedule(compare_from=plan.reset_cycles)


def export_hex(iface: ModuleInterface, vectors: list[InputVector]) -> str:
    """Hex memory image: one line per cycle, `$readmemh`-ready.

    Ports are concatenated MSB-first in declared order (first declared port in
    the top bits), each line zero-padded to the full concatenated width.
    """
    ports = iface.driven_inputs()
    total_width = sum(p.width for p in ports)
    digits = max(1, (total_width + 3) // 4)
    lines = []
    for vec in vectors:
        word = 0
        for p in ports:
            word = (word << p.width) | (vec.values[p.name] & ((1 << p.width) - 1))
        lines.append(format(word, f"0{digits}x"))
    return "\n".join(lines) + "\n"
