"""Custom types for pydantic models.

i.e. allow validation and JSON serialization of numpy arrays.
https://github.com/pydantic/pydantic/issues/7017
"""

import numpy as np
from pydantic import BeforeValidator, PlainSerializer
from typing_extensions import Annotated


def float_array_before_validator(x):
    return np.asarray(x, dtype=float)


def int_array_before_validator(x):
    return np.asarray(x, dtype=np.int64)


def nd_array_serializer(x):
    return np.asarray(x).tolist()


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(float_array_before_validator),
    PlainSerializer(nd_array_serializer, return_type=list),
]
IntArray = Annotated[
    np.ndarray,
    BeforeValidator(int_array_before_validator),
    PlainSerializer(nd_array_serializer, return_type=list),
]
