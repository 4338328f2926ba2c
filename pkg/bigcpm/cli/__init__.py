"""Command line front end"""
from .runner import RunArtifacts, RunConfig, build_config, ingest_csv, load_fit, read_config_file, run

__all__ = ["RunArtifacts", "RunConfig", "build_config", "ingest_csv", "load_fit", "read_config_file", "run"]
