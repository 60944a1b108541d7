from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.exceptions import ProtocolError
from orthoqkd.protocols.base import ProtocolConfig, ProtocolId, ProtocolTranscript
from orthoqkd.protocols.dll import run_dll_family
from orthoqkd.protocols.gv import run_gv
from orthoqkd.protocols.pingpong import run_pp_family, run_pp_gv_family


logger = AdapterLogger("orthoqkd")


def run_protocol(config: ProtocolConfig) -> ProtocolTranscript:
    protocol = config.protocol
    if protocol == ProtocolId.GV:
        transcript = run_gv(config)
    elif protocol in (ProtocolId.PP, ProtocolId.CL):
        transcript = run_pp_family(config)
    elif protocol in (ProtocolId.PP_GV, ProtocolId.CL_GV):
        transcript = run_pp_gv_family(config)
    elif protocol in (ProtocolId.DLL, ProtocolId.DLL_GV):
        transcript = run_dll_family(config)
    else:
        raise ProtocolError(f"Invalid protocol id: '{protocol}'")
    logger.debug(
        f"{protocol} run with seed {config.seed} finished: aborted={transcript.aborted}, "
        f"error rates {transcript.error_rates}"
    )
    return transcript
