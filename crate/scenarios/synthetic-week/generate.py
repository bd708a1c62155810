"""Writes the synthetic 7-day scenario: capacity factor, demand, and price."""

import math

HOURS = 168
# peak capacity factor per day; days 3 and 4 are overcast
DAY_PEAK = [0.85, 0.80, 0.45, 0.35, 0.75, 0.85, 0.80]


def capacity_factor(h):
    day, hour = divmod(h, 24)
    x = math.sin((hour - 6) / 12 * math.pi)
    return round(max(x, 0.0) * DAY_PEAK[day], 5) if 6 < hour < 18 else 0.0


def demand(h):
    day, hour = divmod(h, 24)
    weekend = 0.85 if day >= 5 else 1.0
    bump = max(math.sin((hour - 7) / 14 * math.pi), 0.0) if 7 < hour < 21 else 0.0
    return round(weekend * (10.0 + 6.0 * bump), 5)


def price(h):
    hour = h % 24
    evening = 18.0 if 17 <= hour < 21 else 0.0
    night = -8.0 if hour < 6 else 0.0
    return round(52.0 + evening + night, 5)


def write(name, fn):
    with open(name, "w") as f:
        f.write("hour_index,value\n")
        for h in range(HOURS):
            f.write(f"{h},{fn(h):g}\n")


write("capacity_factor.csv", capacity_factor)
write("demand.csv", demand)
write("price.csv", price)
