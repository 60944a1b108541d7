import hashlib
import json
from typing import Any, Dict, Mapping, Sequence, Union

import numpy as np


_TRUE_STRINGS = ("true", "yes", "1")
_FALSE_STRINGS = ("false", "no", "0")


def evaluate_bool_str(value: str) -> bool:
    value = value.strip().lower()
    if value in _TRUE_STRINGS:
        return True
    elif value in _FALSE_STRINGS:
        return False
    else:
        raise ValueError(f"Invalid boolean string value for a scenario flag: {value}")


def evaluate_bool(value: Union[str, bool, None]) -> bool:
    if value is None:
        return False
    if isinstance(value, bool):
        return value
    elif isinstance(value, str):
        return evaluate_bool_str(value)
    else:
        raise TypeError(
            f"Invalid type for scenario flag, "
            f"expecting boolean or str, received: {type(value)}"
        )


def spawn_generators(seed: int, names: Sequence[str]) -> Dict[str, np.random.Generator]:
    """
    Derive one independent PCG64 stream per name from a single seed.

    The streams are assigned in the order of `names`, so adding a new name at the end
    never perturbs the streams handed out before it.
    """
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {
        name: np.random.Generator(np.random.PCG64(child)) for name, child in zip(names, children)
    }


def draw_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**32))


def stable_float(value: float, digits: int = 12) -> float:
    return float(f"{value:.{digits}g}")


def stable_json(value: Any) -> Any:
    """
    Round every float in a nested structure so reruns serialize identically.
    """
    if isinstance(value, (float, np.floating)):
        return stable_float(float(value))
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Mapping):
        return {str(key): stable_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [stable_json(item) for item in value]
    if isinstance(value, np.ndarray):
        return stable_json(value.tolist())
    return value


def dumps(value: Any) -> str:
    return json.dumps(stable_json(value), sort_keys=True, indent=2)


def config_hash(config_dict: Mapping[str, Any]) -> str:
    canonical = json.dumps(stable_json(config_dict), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
