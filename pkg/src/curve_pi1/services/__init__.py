# Services module for curve_pi1
# Pipeline orchestration and report rendering on top of the algebra modules.
