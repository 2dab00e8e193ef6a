"""Gateway configuration: a flat, commented key-value file.

Example::

    # routing
    mode = NATIVE
    tau_asr = 0.5
    tau_mt = 0.0
    tau_nlu = 1.2
    model_path = models/native.json
    catalog_path = corpus/catalog.json
    # lexicon_path is required only in ONLINE_BRIDGE mode
    lexicon_path = corpus/lexicon_reverse_lossy.tsv
    source_lang = es
    target_lang = en
    noise.p_sub = 0.13
    noise.p_del = 0.09
    noise.p_ins = 0.11
    noise.seed = 7
    n_best = 5
    listen_host = 127.0.0.1
    listen_port = 8000
    claim_timeout_s = 300
    event_log = gateway-events.ndjson
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .bridge import LexiconTranslator, NoiseConfig, SimulatedAsr, TranslationLexicon
from .calibration import ThresholdSet
from .data import LabelCatalog
from .nlu import ClassifierModel
from .router import PipelineMode, Router


class ConfigError(Exception):
    pass


def parse_kv(text: str) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


@dataclass
class GatewayConfig:
    mode: PipelineMode = PipelineMode.NATIVE
    thresholds: ThresholdSet = field(default_factory=ThresholdSet)
    model_path: str = ""
    catalog_path: str = ""
    lexicon_path: str | None = None
    source_lang: str = "es"
    target_lang: str = "en"
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    n_best: int = 5
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    claim_timeout_s: float = 300.0
    event_log: str | None = None
    seed: int = 0

    @classmethod
    def load(cls, path: str | Path) -> "GatewayConfig":
        base = Path(path).parent
        kv = parse_kv(Path(path).read_text(encoding="utf-8"))

        def resolve(p: str) -> str:
            return str((base / p).resolve()) if not Path(p).is_absolute() else p

        cfg = cls()
        try:
            if "mode" in kv:
                cfg.mode = PipelineMode(kv["mode"])
            cfg.thresholds = ThresholdSet(
                tau_asr=float(kv.get("tau_asr", 0.0)),
                tau_mt=float(kv.get("tau_mt", 0.0)),
                tau_nlu=float(kv.get("tau_nlu", 0.0)),
            )
            cfg.model_path = resolve(kv["model_path"])
            cfg.catalog_path = resolve(kv["catalog_path"])
            if "lexicon_path" in kv:
                cfg.lexicon_path = resolve(kv["lexicon_path"])
            cfg.source_lang = kv.get("source_lang", cfg.source_lang)
            cfg.target_lang = kv.get("target_lang", cfg.target_lang)
            cfg.noise = NoiseConfig(
                p_sub=float(kv.get("noise.p_sub", 0.13)),
                p_del=float(kv.get("noise.p_del", 0.09)),
                p_ins=float(kv.get("noise.p_ins", 0.11)),
                seed=int(kv.get("noise.seed", 0)),
            )
            cfg.n_best = int(kv.get("n_best", 5))
            cfg.listen_host = kv.get("listen_host", cfg.listen_host)
            cfg.listen_port = int(kv.get("listen_port", cfg.listen_port))
            cfg.claim_timeout_s = float(kv.get("claim_timeout_s", 300.0))
            if "event_log" in kv:
                cfg.event_log = str(base / kv["event_log"])
            cfg.seed = int(kv.get("seed", 0))
        except KeyError as exc:
            raise ConfigError(f"{path}: missing required key {exc.args[0]!r}") from exc
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc

        for required in (cfg.model_path, cfg.catalog_path):
            if not Path(required).is_file():
                raise ConfigError(f"{path}: referenced file does not exist: {required}")
        if cfg.mode == PipelineMode.ONLINE_BRIDGE:
            if not cfg.lexicon_path:
                raise ConfigError(f"{path}: ONLINE_BRIDGE mode requires lexicon_path")
            if not Path(cfg.lexicon_path).is_file():
                raise ConfigError(f"{path}: referenced file does not exist: {cfg.lexicon_path}")
        return cfg

    def build_router(self, log_file=None) -> Router:
        model = ClassifierModel.load(self.model_path)
        catalog = LabelCatalog.load(self.catalog_path)
        asr = SimulatedAsr(self.noise, n_best=self.n_best)
        mt = None
        if self.mode == PipelineMode.ONLINE_BRIDGE:
            lexicon = TranslationLexicon.load(self.lexicon_path)
            mt = LexiconTranslator(
                lexicon, src=self.source_lang, tgt=self.target_lang, seed=self.seed
            )
        return Router(
            mode=self.mode,
            model=model,
            thresholds=self.thresholds,
            catalog=catalog,
            asr=asr,
            mt=mt,
            src_lang=self.source_lang,
            tgt_lang=self.target_lang,
            claim_timeout=self.claim_timeout_s,
            log_file=log_file,
        )
