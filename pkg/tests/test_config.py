import pytest

from dickenet.config import canonical_text, parameter_hash, parse_config_text
from dickenet.errors import ConfigError
from dickenet.scenarios import build_gravity, build_seed, build_times, load_scenario

GOOD = """\
# a minimal scenario
[scenario]
name = demo
n_atoms = 8
rng_seed = 3

[state]
kind = exact
variant = noon_minus_one

[gravity]
omega_eg = 2.0      # rad/s, exaggerated
c = 1.0
g = 1.0
delta_z = 0.5

[seed]
phi0 = 0.25

[measurement]
scheme = nonlocal_parity
path = analytic

[time]
start = 0.0
stop = 10.0
steps = 101
"""


class TestParser:
    def test_values_and_comments(self):
        cfg = parse_config_text(GOOD)
        assert cfg.get("scenario", "n_atoms", int) == 8
        assert cfg.get("gravity", "omega_eg", float) == 2.0
        assert cfg.get("seed", "phi0", float) == 0.25
        assert cfg.get("measurement", "scheme", str) == "nonlocal_parity"

    def test_lists_and_strings(self):
        cfg = parse_config_text('[a]\nxs = 1, 2.5, 3\nname = "hello world"\nflag = true\n')
        assert cfg.get_list("a", "xs", float) == [1.0, 2.5, 3.0]
        assert cfg.get("a", "name", str) == "hello world"
        assert cfg.get("a", "flag", bool) is True

    def test_syntax_errors_carry_lines(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("[a]\nkey value\n")
        assert err.value.line == 2
        with pytest.raises(ConfigError) as err:
            parse_config_text("key = 1\n")
        assert err.value.line == 1
        with pytest.raises(ConfigError) as err:
            parse_config_text("[a]\nx = 1\nx = 2\n")
        assert err.value.line == 3

    def test_semantic_errors_carry_lines(self):
        cfg = parse_config_text(GOOD)
        with pytest.raises(ConfigError) as err:
            cfg.get("scenario", "n_atoms", str)
        assert err.value.line == 4
        with pytest.raises(ConfigError) as err:
            cfg.get("gravity", "missing_key", float)
        assert err.value.line is not None

    def test_unknown_key_rejected(self):
        text = GOOD + "\n[scenario2]\nx = 1\n"
        cfg = parse_config_text(text)
        with pytest.raises(ConfigError):
            load_scenario(cfg)

    def test_round_trip_equivalence(self):
        cfg = parse_config_text(GOOD)
        again = parse_config_text(canonical_text(cfg))
        assert again.sections.keys() == cfg.sections.keys()
        for section in cfg.sections:
            for key in cfg.sections[section]:
                assert again.sections[section][key].value == cfg.sections[section][key].value

    def test_parameter_hash_depends_on_seed_and_content(self):
        cfg = parse_config_text(GOOD)
        assert parameter_hash(cfg, 1) != parameter_hash(cfg, 2)
        other = parse_config_text(GOOD.replace("stop = 10.0", "stop = 11.0"))
        assert parameter_hash(cfg, 1) != parameter_hash(other, 1)


class TestScenarioBuilders:
    def test_full_assembly(self):
        cfg = parse_config_text(GOOD)
        scenario = load_scenario(cfg)
        assert scenario.name == "demo"
        assert scenario.dims.n_atoms == 8
        ctx = build_gravity(cfg)
        assert ctx.delta_phi == pytest.approx(0.5)
        seed = build_seed(cfg)
        assert seed.phi0 == 0.25
        times = build_times(cfg)
        assert times.size == 101 and times[-1] == 10.0

    def test_time_ordering_enforced(self):
        cfg = parse_config_text(GOOD.replace("stop = 10.0", "stop = 0.0"))
        with pytest.raises(ConfigError):
            build_times(cfg)

    def test_domain_errors_become_config_errors(self):
        cfg = parse_config_text(GOOD.replace("omega_eg = 2.0", "omega_eg = -2.0"))
        with pytest.raises(ConfigError):
            build_gravity(cfg)
