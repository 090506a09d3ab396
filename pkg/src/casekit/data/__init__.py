"""Packaged fixtures: the worked failure-response case and its inputs."""

from importlib import resources

CASE_TEMPLATE = "case_template.casl"
FAILURE_RESPONSE_CASE = "failure_response.casl"
CATALOGUE = "failure_response.outcomes"
RECORDS = "failure_response.records"
SERVICE_SPECS = "delivery_service.specs"
FRAM_INITIAL = "initial_delivery.fram"
DELIVERY_NET = "delivery.dpnl"
DELIVERY_LOG = "delivery.evl"


def path(name: str):
    return resources.files(__name__).joinpath(name)


def read_text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
