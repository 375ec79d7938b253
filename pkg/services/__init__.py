# OPF information ranking services
