from .jsonable import JSONable, JSONObject, to_jsonable
from .data_model import DataModel


__all__ = [
    "JSONable",
    "JSONObject",
    "to_jsonable",
    "DataModel",
]
