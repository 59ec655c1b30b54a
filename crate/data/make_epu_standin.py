"""Regenerate epu_daily.csv, the synthetic stand-in for the daily US EPU index.

The official daily series is not bundled. This draws an AR(1) around a slowly
rising mean, then rescales it affinely so that its Jan 21 - Mar 9 2020 range is
[22.33, 202.5]. Parameters were fixed before looking at any estimation output.

    python3 make_epu_standin.py > epu_daily.csv
"""

import datetime as dt
import random

SEED = 20200310
RHO = 0.3
SD = 35.0
START = dt.date(2020, 1, 1)
END = dt.date(2020, 3, 10)
LOW, HIGH = 22.33, 202.5


def main():
    rng = random.Random(SEED)
    days = (END - START).days + 1
    u = 0.0
    raw = []
    for i in range(days):
        mean = 90.0 + 40.0 * i / (days - 1)
        u = RHO * u + rng.gauss(0.0, SD)
        raw.append(mean + u)
    dates = [START + dt.timedelta(i) for i in range(days)]
    window = [v for d, v in zip(dates, raw) if dt.date(2020, 1, 21) <= d <= dt.date(2020, 3, 9)]
    lo, hi = min(window), max(window)
    scale = (HIGH - LOW) / (hi - lo)
    print("date,epu")
    for d, v in zip(dates, raw):
        print(f"{d},{max(LOW + (v - lo) * scale, 1.0):.2f}")


if __name__ == "__main__":
    main()
