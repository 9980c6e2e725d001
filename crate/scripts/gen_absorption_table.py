"""Generate the bundled absorption table (crates/core/data/air_296k_1atm.csv).

The table is an approximation: a reduced Van Vleck-Weisskopf line sum over the
dominant water-vapour and oxygen lines between 0.1 and 1 THz plus a quadratic
continuum. Peak strengths are shaped to follow the sea-level reference curve
of ITU-R P.676 for ~7.5 g/m^3 water vapour (0.96 % H2O at 296 K, 1 atm).
It is NOT derived from HITRAN line data; replace it with a HITRAN-derived
table when accurate line shapes matter.
"""
import numpy as np

# (centre GHz, approximate peak specific attenuation dB/km, half width GHz)
LINES = [
    (118.75, 1.8, 1.5),     # O2
    (183.31, 28.0, 3.0),    # H2O
    (325.15, 35.0, 3.0),
    (380.20, 180.0, 3.0),
    (448.00, 80.0, 3.0),
    (474.69, 40.0, 3.0),
    (556.94, 2500.0, 3.2),
    (620.70, 150.0, 3.0),
    (752.03, 2500.0, 3.2),
    (916.17, 500.0, 3.0),
    (970.32, 600.0, 3.0),
    (987.93, 3000.0, 3.2),
]
CONTINUUM_DB_KM_AT_300 = 2.0
DB_PER_NEPER_KM = 10.0 * np.log10(np.e) * 1000.0  # dB/km per (1/m)


def vvw(f, f0, g):
    shape = (f / f0) ** 2 * (g / ((f - f0) ** 2 + g ** 2) + g / ((f + f0) ** 2 + g ** 2))
    return shape * g  # ~1 at the line centre


def main():
    f = np.arange(100.0, 1000.0 + 0.5, 1.0)
    att = CONTINUUM_DB_KM_AT_300 * (f / 300.0) ** 2
    for f0, peak, g in LINES:
        att += peak * vvw(f, f0, g)
    k = att / DB_PER_NEPER_KM
    with open("crates/core/data/air_296k_1atm.csv", "w") as out:
        out.write("frequency_hz,k_per_m\n")
        for fi, ki in zip(f, k):
            out.write(f"{fi * 1e9:.6e},{ki:.6e}\n")


if __name__ == "__main__":
    main()
