"""Service and engine configuration.

Values resolve in order: built-in defaults, then a JSON config file,
then TUTORDESK_* environment variables. Path fields left unset fall back
to the data files bundled with the package; an unset storage path means
the engine runs without persistence.
"""

import json
import os
from dataclasses import dataclass, fields


@dataclass
class EngineConfig:
    catalog_path: str = None
    normalizer_path: str = None
    intents_path: str = None
    templates_path: str = None
    locale: str = None
    storage_path: str = None
    host: str = "127.0.0.1"
    port: int = 8321
    api_token: str = None

    @classmethod
    def load(cls, path: str = None, env=None) -> "EngineConfig":
        env = os.environ if env is None else env
        values = {}
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
            known = {f.name for f in fields(cls)}
            unknown = set(doc) - known
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(doc)
        for f in fields(cls):
            env_key = f"TUTORDESK_{f.name.upper()}"
            if env_key in env:
                raw = env[env_key]
                values[f.name] = int(raw) if f.name == "port" else raw
        return cls(**values)
