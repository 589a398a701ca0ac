import pytest

from qtransduce.agent import AdaptationConfig, LearningConfig
from qtransduce.config import config_hash, load_config, parse_config, serialize
from qtransduce.enums import Algorithm, DriftTarget
from qtransduce.env import DriftSpec, EnvConfig
from qtransduce.errors import ConfigError

MINIMAL = "[run]\nseed = 42\n"


def test_minimal_config_takes_the_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.seed == 42
    assert cfg.algorithm == Algorithm.ADVANTAGE
    assert cfg.env == EnvConfig(seed=42)
    assert cfg.learning == LearningConfig(seed=42)
    assert cfg.adaptation == AdaptationConfig(monitor_seed=42)
    assert cfg.output_dir == "runs"
    assert cfg.write_trace


def test_out_of_range_value_names_key_and_line():
    text = "[run]\nseed = 1\n\n[transducer]\ndelta_m = -1.0\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == "delta_m"
    assert info.value.line == 5
    assert "[transducer] delta_m (line 5) = -1.0 must be > 0" in str(info.value)


def test_unknown_key_is_rejected_with_its_line():
    with pytest.raises(ConfigError) as info:
        parse_config("[run]\nseed = 1\n\n[learning]\nepisodes = 10\nlearning_rate = 0.1\n")
    assert info.value.key == "learning_rate"
    assert info.value.line == 6


def test_unknown_section_is_rejected_with_its_line():
    with pytest.raises(ConfigError) as info:
        parse_config("[run]\nseed = 1\n[plotting]\ndpi = 300\n")
    assert info.value.key == "plotting"
    assert info.value.line == 3


def test_seed_is_mandatory():
    with pytest.raises(ConfigError) as info:
        parse_config("[learning]\nepisodes = 3\n")
    assert info.value.key == "seed"


def test_unparseable_documents_report_a_line():
    with pytest.raises(ConfigError) as info:
        parse_config("[run]\nseed = 1\nnot a key value pair\n")
    assert info.value.line == 3
    with pytest.raises(ConfigError) as info:
        parse_config("[run]\nseed = 1\n[learning]\nepisodes = many\n")
    assert info.value.key == "episodes"
    assert info.value.line == 4


def test_invalid_choices_and_ranges():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "algorithm = sarsa\n")
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "[environment]\naction_bounds_1 = 3.0, 1.0\n")
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "[sweep]\nomega_min = 5\nomega_max = -5\n")
    with pytest.raises(ConfigError):
        parse_config("[run]\nseed = -3\n")


def test_drift_section_builds_a_drift_spec():
    drift = "[environment]\ndrift_target = delta_m\ndrift_onset_step = 640\ndrift_jump_factor = 2\n"
    cfg = parse_config(MINIMAL + drift)
    assert cfg.env.drift == DriftSpec(DriftTarget.DELTA_M, onset_step=640, jump_factor=2.0)


def test_serialized_config_parses_back_to_itself():
    text = (
        "[run]\nseed = 9\nalgorithm = qac\ncutoffs = 3, 3, 8\n"
        "[transducer]\nn_th = 0.3\nn_pump = 3000, 5000\n"
        "[environment]\nepisode_length = 32\ndrift_target = n_th\ndrift_walk_sd = 0.01\n"
        "[learning]\nhidden = 16\nalpha_theta = 0.001\n"
        "[adaptation]\ncadence_seconds = 600\n"
        "[output]\ndirectory = elsewhere\ntrace = no\n"
    )
    cfg = parse_config(text)
    assert parse_config(serialize(cfg)) == cfg
    assert cfg.cutoffs == (3, 3, 8)
    assert cfg.learning.hidden == (16,)
    assert cfg.adaptation.cadence_seconds == 600.0
    assert not cfg.write_trace


def test_hash_tracks_the_content():
    cfg = parse_config(MINIMAL)
    assert config_hash(cfg) == config_hash(parse_config(serialize(cfg)))
    assert config_hash(cfg) != config_hash(cfg.with_seed(43))
    assert config_hash(cfg) == config_hash(cfg.with_output_dir("elsewhere").with_output_dir("runs"))


def test_with_seed_rekeys_every_component():
    cfg = parse_config(MINIMAL).with_seed(7)
    assert cfg.seed == cfg.env.seed == cfg.learning.seed == cfg.adaptation.monitor_seed == 7


def test_config_echo_uses_file_notation():
    echo = parse_config(MINIMAL).to_dict()
    assert echo["run"]["seed"] == "42"
    assert echo["environment"]["drift_target"] == "none"
    assert echo["transducer"]["delta_m"] == "1.0"


def test_load_config_from_disk(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(MINIMAL)
    assert load_config(path).seed == 42
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "missing.ini")
    assert isinstance(info.value.__cause__, OSError)


def test_parse_failures_keep_their_cause():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "[learning]\nepisodes = many\n")
    assert isinstance(info.value.__cause__, ValueError)
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "algorithm = sarsa\n")
    assert isinstance(info.value.__cause__, ValueError)
    assert isinstance(info.value.__cause__.__cause__, ValueError)


def test_zero_coupling_is_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "[transducer]\ngamma = 0.0, 0.02\n")
    assert info.value.key == "gamma"
