import logging

from opentelemetry import trace

from ringres.settings import CoreSettings

logger = logging.getLogger(__name__)

_configured = False


def configure_tracing(settings: CoreSettings) -> bool:
    """Install an OTLP-exporting tracer provider when an endpoint is configured.

    Without TELEMETRY_ENDPOINT the no-op provider of the API stays in place and
    spans cost next to nothing.
    """
    global _configured
    if _configured or not settings.telemetry_endpoint:
        return False

    from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
    from opentelemetry.sdk.resources import Resource
    from opentelemetry.sdk.trace import TracerProvider
    from opentelemetry.sdk.trace.export import BatchSpanProcessor

    provider = TracerProvider(
        resource=Resource.create({"service.name": settings.service_name})
    )
    provider.add_span_processor(
        BatchSpanProcessor(OTLPSpanExporter(endpoint=settings.telemetry_endpoint))
    )
    trace.set_tracer_provider(provider)
    _configured = True
    logger.info(f"Exporting traces to {settings.telemetry_endpoint}")
    return True


def get_tracer() -> trace.Tracer:
    return trace.get_tracer("ringres")
