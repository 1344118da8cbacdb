import struct
from pathlib import Path
from typing import Union

import numpy as np
import torch
from loguru import logger

from core.errors import CheckpointError
from core.models import DanConfig
from .networks import DAN

MAGIC = b"DANW"
CONFIG_FIELDS = list(DanConfig.model_fields)


def save_checkpoint(model: DAN, path: Union[str, Path]):
    """
    'DANW' 매직, int32 설정 블록(필드 수 + 값), 이름 붙은 파라미터 블롭을 기록합니다.
    블롭: 이름 길이, UTF-8 이름, 차원 수, shape, little-endian float64 값.
    """
    cfg = model.config
    values = [int(getattr(cfg, name)) for name in CONFIG_FIELDS]
    payload = bytearray(MAGIC)
    payload += struct.pack("<i", len(values)) + struct.pack(f"<{len(values)}i", *values)

    state = model.state_dict()
    payload += struct.pack("<i", len(state))
    for name, tensor in state.items():
        encoded = name.encode("utf-8")
        data = tensor.detach().cpu().numpy().astype("<f8")
        payload += struct.pack("<i", len(encoded)) + encoded
        payload += struct.pack("<i", data.ndim) + struct.pack(f"<{data.ndim}i", *data.shape)
        payload += data.tobytes()
    Path(path).write_bytes(bytes(payload))
    logger.info(f"체크포인트 저장: {path} (파라미터 {len(state)}개)")


def load_checkpoint(path: Union[str, Path], dtype: torch.dtype = torch.float32) -> DAN:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"체크포인트 파일을 찾을 수 없습니다: {path}")
    data = path.read_bytes()
    if data[:4] != MAGIC:
        raise CheckpointError(f"DANW 체크포인트가 아닙니다: {path}")

    offset = 4

    def take(size: int) -> bytes:
        nonlocal offset
        if size < 0 or offset + size > len(data):
            raise CheckpointError(f"체크포인트가 잘렸습니다 (offset={offset}): {path}")
        chunk = data[offset : offset + size]
        offset += size
        return chunk

    def read(fmt: str):
        return struct.unpack(fmt, take(struct.calcsize(fmt)))

    (count,) = read("<i")
    if count != len(CONFIG_FIELDS):
        raise CheckpointError(f"설정 필드 수({count})가 예상({len(CONFIG_FIELDS)})과 다릅니다: {path}")
    cfg = DanConfig(**dict(zip(CONFIG_FIELDS, read(f"<{count}i"))))

    (n_blobs,) = read("<i")
    state = {}
    for _ in range(n_blobs):
        (name_len,) = read("<i")
        try:
            name = take(name_len).decode("utf-8")
        except UnicodeDecodeError:
            raise CheckpointError(f"파라미터 이름을 해석할 수 없습니다: {path}")
        (ndim,) = read("<i")
        shape = read(f"<{ndim}i") if ndim else ()
        n_values = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(take(8 * n_values), dtype="<f8")
        state[name] = torch.as_tensor(values.reshape(shape).copy(), dtype=dtype)

    if "kernel_init" not in state:
        raise CheckpointError(f"체크포인트에 kernel_init이 없습니다: {path}")
    model = DAN(cfg, state["kernel_init"]).to(dtype)
    try:
        model.load_state_dict(state)
    except RuntimeError as e:
        raise CheckpointError(f"파라미터가 설정과 맞지 않습니다: {e}")
    logger.info(f"체크포인트 로드: {path} (scale={cfg.scale}, T={cfg.iterations})")
    return model.eval()
