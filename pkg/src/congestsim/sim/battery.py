"""Linear battery model with a hover penalty and a low-power RTL threshold."""

from __future__ import annotations

from dataclasses import dataclass, replace

DRAIN_RATES = {
    "cruise": 1.0,
    "ascend": 1.0,
    "descend": 1.0,
    "hover": None,  # uses the battery's hover multiplier
    "ground": 0.0,
}


@dataclass(frozen=True)
class Battery:
    capacity_s: float
    drawn_s: float = 0.0
    hover_multiplier: float = 1.5
    rtl_threshold: float = 0.25

    @property
    def remaining_s(self) -> float:
        return self.capacity_s - self.drawn_s

    @property
    def needs_rtl(self) -> bool:
        return self.remaining_s <= self.rtl_threshold * self.capacity_s


def sample_battery_capacity(spec, rng) -> float:
    """Draw a capacity in seconds from Normal(mean, std), clamped to
    [0.5, 1.5] x mean. spec carries battery_mean_min/battery_std_min."""
    mean = spec.battery_mean_min
    draw = rng.normal(mean, spec.battery_std_min)
    draw = min(max(draw, 0.5 * mean), 1.5 * mean)
    return draw * 60.0


def drain_battery(battery: Battery, dt_ms: float, activity: str) -> Battery:
    """Consume dt at the activity's rate; never exceeds capacity."""
    if dt_ms < 0:
        raise ValueError("dt must be non-negative")
    rate = DRAIN_RATES[activity]
    if rate is None:
        rate = battery.hover_multiplier
    drawn = min(battery.capacity_s, battery.drawn_s + dt_ms / 1000.0 * rate)
    return replace(battery, drawn_s=drawn)
