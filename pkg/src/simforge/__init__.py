"""simforge: English descriptions of logistics systems in, validated
executable simulations out.

Pipeline pieces: a typed simulation IR with a canonical text form (`ir`),
a controlled-English frontend (`frontend`), a sandboxed mini-language the
simulations run in (`simscript`), reference engines (`engines`), a compiler
from IR to SimScript (`codegen`), prompt construction and completion
backends for the language-model path (`promptkit`, `llm`), machine checks
and oracles (`validation`), and the approval workflow with CLI and HTTP
interfaces (`workflow`, `cli`, `api`).
"""

__version__ = "0.1.0"
