import json

import pytest

import gemtomo


def small_config_dict(nz=32, nxy=16):
    cfg = json.loads(gemtomo.RunConfig.default().to_json())
    dz = cfg["grid"]["z"]["step_m"]
    for ax in ("x", "y"):
        cfg["grid"][ax] = {"n": nxy, "step_m": 25e-6, "origin_m": -(nxy // 2) * 25e-6}
    cfg["grid"]["z"] = {"n": nz, "step_m": dz, "origin_m": -(nz // 2) * dz}
    dt = 1.0 / (cfg["physics"]["beta0_hz_per_m"] * nz * dz)
    cfg["times"] = {"n": nz, "step_s": dt, "origin_s": -(nz // 2) * dt}
    cfg["scenario"]["cloud"]["length_z_m"] = 0.6 * nz * dz
    cfg["scenario"]["cloud"]["edge_softness_m"] = 2 * dz
    cfg["detector"]["enabled"] = False
    return cfg


@pytest.fixture
def small_config():
    return gemtomo.RunConfig.from_json(json.dumps(small_config_dict()))
