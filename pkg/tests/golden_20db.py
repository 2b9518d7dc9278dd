"""Frozen 20 dB golden values from scripts/derive_goldens.py (mpmath, 50 digits)."""

S = [
    [9e-12, 2.985940920099958e-08, 1.4632028756267847e-07],
    [2.985940920099958e-08, 9.906492420363761e-05, 0.00048544859341577185],
    [1.4632028756267847e-07, 0.00048544859341577185, 0.0023788473947138804],
]
T = [
    [4.5e-12, 1.492970460049979e-08, 7.316014378133923e-08],
    [1.492970460049979e-08, 1.5146450185091942e-06, 7.3657595400621816e-06],
    [7.316014378133923e-08, 7.3657595400621816e-06, 3.581771560913597e-05],
]
Y11 = 0.01000054000729
T11 = 0.000150270003645
E11_TRUE = 0.015026188939343184
S_TILDE = (9.901089575076336e-05, 0.00048529809163671075, 0.00048529809163671075, 0.002378669902543706)
T_TILDE = (1.4876307920720715e-06, 7.290508650531641e-06, 7.290508650531641e-06, 3.572896952404872e-05)
S_STAR = (0.009458742391856201, 0.024728527401115852, 0.024728527401115852, 0.06464919352854219)
T_STAR = (0.00014213387128253447, 0.0003713961680970417, 0.0003713961680970417, 0.0009704588655375891)
S11 = {
    "123": 0.009297119408034845,
    "124": 0.008650627472749422,
    "134": 0.008650627472749422,
    "234": 0.005418167796322313,
    "14": 0.008650627472749422,
    "alpha": 0.005735251140751792,
}
S11_EXACT = 0.009364183115732682
T11_EXACT = 0.00017915689418940257
E11_SIMPLE = 0.019543648659503334
E11_EXACT = 0.01913214339950301
R = {
    "123": 0.00042531262781303405,
    "124": 0.0003676102843584853,
    "134": 0.0003676102843584853,
    "234": 8.175512370691839e-05,
    "14": 0.0003676102843584853,
    "alpha": 0.00010952323202276714,
    "exact": 0.00043263134404288885,
    "asymptotic": 0.0005052590855782008,
}
# signal intensity grid 0.11..1.00 step 0.01, decoy fixed at 0.1: (mu2_opt, R_opt)
OPT = {
    "exact": (0.52, 0.0004339591537807509),
    "123": (0.52, 0.00042685625727056106),
    "14": (0.47, 0.0003700857756302035),
    "alpha": (0.35, 0.0002626947095105281),
    "asymptotic": (0.57, 0.0005210022291617239),
}
