from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="SFTDEG_", env_file=".env", extra="ignore")

    # Resource guards
    BALL_NODE_CAP: int = 10**7
    ORACLE_LABELING_CAP: int = 10**8
    ORACLE_CHUNK: int = 2**16
    PERIODIC_WORD_CAP: int = 10**6
    SUBSYSTEM_CAP: int = 10**6
    SPECTRUM_MATRIX_CAP: int = 10**7

    # Numerics
    RADIUS_TOL: float = 1e-12
    MAX_POWER_ITERATIONS: int = 10**6
    CROSS_CHECK_RADIUS: bool = True
    CROSS_CHECK_MAX_DIM: int = 64
    DEDUP_TOL: float = 1e-9

    # Runtime
    THREADS: int = 1
    LOG_LEVEL: str = "WARNING"
    FLOAT_DIGITS: int = 12


settings = Settings()
