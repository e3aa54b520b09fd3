"""Regenerates the elliptic bandpass coefficients stored in src/fixtures.rs.

Second-order elliptic prototype transformed to a fourth-order bandpass:
1 dB passband ripple, 40 dB stopband attenuation, passband edges 0.45 and
0.63 in units of the Nyquist frequency.

    python3 elliptic_bandpass.py
"""

from scipy import signal

b, a = signal.ellip(2, 1, 40, [0.45, 0.63], "bandpass")
print("num =", [float(f"{v:.17g}") for v in b])
print("den =", [float(f"{v:.17g}") for v in a])
