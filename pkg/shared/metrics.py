from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest

REGISTRY = CollectorRegistry(auto_describe=True)

RANKING_DURATION = Histogram(
    "opfr_ranking_duration_seconds",
    "Wall-clock seconds spent ranking one batch of queries",
    ["technique"],
    registry=REGISTRY,
)

TRAINING_DURATION = Histogram(
    "opfr_training_duration_seconds",
    "Wall-clock seconds spent training one forest",
    ["variant"],
    registry=REGISTRY,
)

QUERIES_RANKED = Counter(
    "opfr_queries_ranked_total",
    "Total number of ranked queries",
    ["technique"],
    registry=REGISTRY,
)


def render_metrics() -> str:
    return generate_latest(REGISTRY).decode("utf-8")
