# Test package for DSQI Bench
