#!/usr/bin/env python3
"""Generate the bundled island-feeder case data (data/*.csv).

Synthesizes a 2024 hourly load/price year for a small island distribution
feeder plus the yearly peak projection, capacity prices, scarcity events, and
the preinstalled-unit table. The load shape is tuned so that fully flattening
the worst days with a 0.913^2 round-trip battery needs about 30% of the
average load in power and about 6.5 hours of duration, which drives the
storage investment cap used by the planning runs.

Deterministic: fixed seed, stable output ordering.
"""

import csv
import datetime as dt
import math
import pathlib

import numpy as np
from scipy.optimize import linprog

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"
ETA = 0.913
ETA_RT = ETA * ETA

# Top five peak days (day-of-year in the 366-day 2024 calendar).
PEAK_DAYS = {
    dt.date(2024, 7, 15): 57.0,
    dt.date(2024, 7, 16): 56.8,
    dt.date(2024, 8, 2): 56.5,
    dt.date(2024, 8, 3): 56.2,
    dt.date(2024, 8, 5): 55.9,
}


def plateau_shape(rng, mid, ridge_width, noise=0.004):
    """24-hour normalized shape: night trough at 0, morning rise onto a
    daytime shoulder at `mid`, a broad afternoon-evening ridge peaking at
    1.0, and a late decline."""
    h = np.arange(24.0)
    rise = 1.0 / (1.0 + np.exp(-(h - 5.9) / 1.0))
    fall = 1.0 / (1.0 + np.exp((h - 22.9) / 0.8))
    ridge = np.exp(-(((h - 18.2) / ridge_width) ** 2))
    shape = rise * fall * (mid + (1.0 - mid) * ridge)
    shape += rng.normal(0.0, noise, 24)
    shape -= shape.min()
    return shape / shape.max()


def build_load(rng, plateau, evening_width, shoulder_base, swing_peak=23.0):
    """Hourly load for every day of 2024 (including Feb 29). One shape
    family for the whole year keeps the flattening requirement of ordinary
    days strictly below the named peak days."""
    start = dt.date(2024, 1, 1)
    days = [(start + dt.timedelta(days=i)) for i in range(366)]
    load = {}
    for date in days:
        doy = (date - start).days
        season = math.cos(2 * math.pi * (doy - 196) / 366)  # +1 mid-July
        summer = max(0.0, season) ** 1.4
        winter = max(0.0, -season)
        peak = (
            shoulder_base
            + 5.0 * winter
            + 13.5 * summer
            + rng.normal(0, 0.6)
        )
        swing = swing_peak - 14.0 + 3.0 * winter + 13.0 * summer + rng.normal(0, 0.3)
        if date in PEAK_DAYS:
            peak = PEAK_DAYS[date]
            swing = swing_peak + rng.normal(0, 0.1)
        else:
            peak = min(peak, 52.8)
        shape = plateau_shape(rng, plateau, evening_width)
        load[date] = (peak - swing) + swing * shape
    return load


def build_price(rng, load):
    """Hourly wholesale price: follows the load shape with an evening skew,
    winter morning bumps, hot-day spikes, and the two scarcity events."""
    price = {}
    for date, profile in sorted(load.items()):
        doy = (date - dt.date(2024, 1, 1)).days
        season = math.cos(2 * math.pi * (doy - 196) / 366)
        winter = max(0.0, -season)
        h = np.arange(24.0)
        norm = (profile - profile.min()) / max(profile.max() - profile.min(), 1e-9)
        evening = np.exp(-(((h - 18.5) / 2.4) ** 2))
        morning = np.exp(-(((h - 8.0) / 1.8) ** 2))
        p = 22.0 + 26.0 * norm + 14.0 * evening + 10.0 * winter * morning
        p += rng.normal(0, 1.0, 24)
        if profile.max() > 54.0:
            p += 90.0 * evening  # hot-day scarcity pricing
        price[date] = np.maximum(p, 15.0)
    # Scarcity events: administrative price spikes.
    price[dt.date(2024, 7, 16)][17:19] = [820.0, 1240.0]
    price[dt.date(2024, 8, 2)][17:18] = [2173.15]
    return price


def flatten_day(profile):
    """Two-stage flattening mirror of the library: exact flattened peak, then
    the minimal-peak-flow schedule at that level. Returns (peak, power,
    energy) with the symmetric efficiency split used by the sizing code."""
    k = len(profile)
    # Stage 1: variables [peak, discharge (k), charge (k)], minimize peak.
    c = np.concatenate(([1.0], np.zeros(2 * k)))
    a_ub, b_ub = [], []
    for i in range(k):
        row = np.zeros(1 + 2 * k)
        row[0] = -1.0
        row[1 + i] = -1.0
        row[1 + k + i] = 1.0
        a_ub.append(row)
        b_ub.append(-profile[i])
    row = np.zeros(1 + 2 * k)
    row[1 : 1 + k] = 1.0
    row[1 + k :] = -ETA_RT
    a_ub.append(row)
    b_ub.append(0.0)
    bounds = [(None, None)] + [(0, None)] * (2 * k)
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
    assert res.success, res.message
    peak = res.x[0]

    # Stage 2: variables [maxflow, discharge (k), charge (k)].
    cap = peak + 1e-7 * max(1.0, abs(peak))
    c = np.concatenate(([1.0], np.full(2 * k, 1e-9)))
    a_ub, b_ub = [], []
    for i in range(k):
        row = np.zeros(1 + 2 * k)
        row[1 + i] = -1.0
        row[1 + k + i] = 1.0
        a_ub.append(row)
        b_ub.append(cap - profile[i])
        for off in (1 + i, 1 + k + i):
            row = np.zeros(1 + 2 * k)
            row[0] = -1.0
            row[off] = 1.0
            a_ub.append(row)
            b_ub.append(0.0)
    row = np.zeros(1 + 2 * k)
    row[1 : 1 + k] = 1.0
    row[1 + k :] = -ETA_RT
    a_ub.append(row)
    b_ub.append(0.0)
    bounds = [(0, None)] * (1 + 2 * k)
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
    assert res.success, res.message
    dis, chg = res.x[1 : 1 + k], res.x[1 + k :]
    power = max(dis.max(), chg.max())
    cum = np.cumsum(ETA * chg - dis / ETA)
    energy = max(cum.max(), 0.0) - min(cum.min(), 0.0)
    return peak, power, energy


def closed_form_peak(profile, eta_rt):
    s = np.sort(profile)[::-1]
    k = len(s)
    best = -np.inf
    for m in range(k + 1):
        denom = m + (k - m) * eta_rt
        if denom <= 0:
            continue
        best = max(best, (s[:m].sum() + eta_rt * s[m:].sum()) / denom)
    return best


def measure(load):
    values = np.concatenate([load[d] for d in sorted(load) if not (d.month == 2 and d.day == 29)])
    mean_load = values.mean()
    power = energy = 0.0
    worst = None
    for date in sorted(load):
        if date.month == 2 and date.day == 29:
            continue
        peak, p, e = flatten_day(load[date])
        cf = closed_form_peak(load[date], ETA_RT)
        assert abs(peak - cf) < 1e-5, (date, peak, cf)
        if p > power:
            worst = date
        power = max(power, p)
        energy = max(energy, e)
    return mean_load, power, energy, power / mean_load, energy / power, worst


def verify(load):
    mean_load, power, energy, share, duration, worst = measure(load)
    values = np.concatenate([load[d] for d in sorted(load) if not (d.month == 2 and d.day == 29)])
    print(f"mean load        {mean_load:8.3f} MW")
    print(f"total energy     {values.sum() / 1e3:8.1f} GWh")
    print(f"flatten power    {power:8.3f} MW  ({share * 100:.1f}% of mean, worst {worst})")
    print(f"flatten energy   {energy:8.3f} MWh")
    print(f"flatten duration {duration:8.3f} h")
    peaks = {d: load[d].max() for d in load}
    top5 = sorted(peaks, key=lambda d: -peaks[d])[:5]
    print("top-5 peak days ", sorted(top5))
    assert set(top5) == set(PEAK_DAYS), top5
    assert 0.285 <= share <= 0.315, share
    assert 6.1 <= duration <= 6.9, duration
    # Peak days must sit comfortably above the busiest ordinary day so the
    # representative-day selection always finds them.
    runner_up = max(peaks[d] for d in peaks if d not in PEAK_DAYS)
    assert runner_up <= 52.9, runner_up
    # Desk-scale dispatch margins at the worst planning-year scale (third
    # projected year over the base peak): the N-1 grid plus the backup unit
    # must cover each day's energy, and the under-grid charging window must
    # fund the above-(grid+backup) discharge with round-trip losses.
    scale = 71.6 / 57.0
    grid_n1, backup = 52.0, 13.0
    for date in sorted(load):
        day = load[date] * scale
        need = np.clip(day - (grid_n1 + backup), 0.0, None).sum()
        window = np.clip(grid_n1 - day, 0.0, None).sum()
        assert day.sum() <= 0.92 * 24 * (grid_n1 + backup), (date, day.sum())
        assert need <= 0.88 * ETA_RT * window, (date, need, window)
    return share, duration


def write_hourly(path, column, data):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["timestamp", column])
        for date in sorted(data):
            for hour, value in enumerate(data[date]):
                w.writerow([f"{date} {hour:02d}:00", f"{value:.3f}"])


def write_static():
    with open(OUT / "peak_projection.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["year", "peak_mw"])
        # Slow growth while the existing system still carries the island,
        # then acceleration toward electrified heating and transport.
        for i, year in enumerate(range(2025, 2051)):
            t = i / 25.0
            peak = 71.2 + 26.8 * (0.12 * t + 0.88 * t ** 2.4)
            w.writerow([year, f"{peak:.2f}"])
    with open(OUT / "capacity_price.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["year", "price_usd_per_kw_month"])
        history = {
            2010: 4.5, 2011: 3.6, 2012: 3.21, 2013: 3.15, 2014: 3.43,
            2015: 4.63, 2016: 3.94, 2017: 5.3, 2018: 7.03, 2019: 5.297,
            2020: 4.631, 2021: 3.8, 2022: 2.611, 2023: 2.591, 2024: 2.59,
            2025: 3.58, 2026: 2.89, 2027: 3.064, 2028: 3.064,
        }
        for year in sorted(history):
            w.writerow([year, history[year]])
    with open(OUT / "scarcity_events.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["date", "start_hour", "end_hour"])
        w.writerow(["2024-07-16", 17, 19])
        w.writerow(["2024-08-02", 17, 18])
    with open(OUT / "units.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["resource", "unit", "capacity_mw", "commission_year"])
        w.writerow(["grid", "cable_a", 52, 1996])
        w.writerow(["grid", "cable_b", 54, 2006])
        w.writerow(["backup", "turbine", 13, 2019])
        w.writerow(["storage", "battery", 6, 2019])


def quick_measure(load):
    """Calibration shortcut: exact mean, flatten LPs only on the days that
    can plausibly set the maximum (largest swings)."""
    days = [d for d in sorted(load) if not (d.month == 2 and d.day == 29)]
    values = np.concatenate([load[d] for d in days])
    mean_load = values.mean()
    swings = sorted(days, key=lambda d: load[d].min() - load[d].max())[:12]
    power = energy = 0.0
    for date in swings:
        _, p, e = flatten_day(load[date])
        power = max(power, p)
        energy = max(energy, e)
    return power / mean_load, energy / power


def calibrate():
    """Search the shape knobs for the sizing window: ~30% of mean load in
    power and ~6.5 h of duration on the worst day."""
    best = None
    for mid in np.arange(0.30, 0.56, 0.05):
        for ridge_width in np.arange(3.0, 4.9, 0.4):
            for shoulder_base in np.arange(39.0, 43.0, 1.0):
                for swing_peak in np.arange(21.0, 24.8, 0.8):
                    rng = np.random.default_rng(42)
                    load = build_load(rng, mid, ridge_width, shoulder_base, swing_peak)
                    share, duration = quick_measure(load)
                    score = abs(share - 0.30) / 0.015 + abs(duration - 6.5) / 0.4
                    if best is None or score < best[0]:
                        best = (score, mid, ridge_width, shoulder_base, swing_peak, share, duration)
                        print(
                            f"mid {mid:.2f} width {ridge_width:.1f} base {shoulder_base:.0f}"
                            f" swing {swing_peak:.1f}"
                            f" -> share {share * 100:.1f}% duration {duration:.2f}h"
                        )
                    if score < 0.35:
                        return mid, ridge_width, shoulder_base, swing_peak
    raise SystemExit(f"calibration failed, best {best}")


def main():
    OUT.mkdir(exist_ok=True)
    plateau, evening_width, shoulder_base, swing_peak = calibrate()
    print(
        f"calibrated: mid {plateau:.2f}, width {evening_width:.1f},"
        f" base {shoulder_base:.0f}, swing {swing_peak:.1f}"
    )
    rng = np.random.default_rng(42)
    load = build_load(rng, plateau, evening_width, shoulder_base, swing_peak)
    price = build_price(rng, load)
    verify(load)
    write_hourly(OUT / "load_2024.csv", "load_mw", load)
    write_hourly(OUT / "price_2024.csv", "price_usd_per_mwh", price)
    write_static()
    print("wrote", sorted(p.name for p in OUT.iterdir()))


if __name__ == "__main__":
    main()
