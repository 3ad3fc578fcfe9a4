# Init file for heat_trace_expansions package
