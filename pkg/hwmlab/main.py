"""
FastAPI app exposing the experiment harness
"""
from typing import List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict

from hwmlab.config import configure_logging
from hwmlab.errors import ConfigError, ParameterOutOfRange
from hwmlab.harness import parse_config, run_subcommand
from hwmlab.models import SUBCOMMANDS

configure_logging()

app = FastAPI(title="Half-Wave Maps Laboratory")

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class RunRequest(BaseModel):
    """Optional overrides; anything left out takes the subcommand defaults."""

    model_config = ConfigDict(extra="forbid")

    dim: Optional[int] = None
    n: Optional[int] = None
    length: Optional[float] = None
    seed: Optional[int] = None
    samples: Optional[int] = None
    band: Optional[int] = None
    method: Optional[str] = None
    dt: Optional[float] = None
    t_final: Optional[float] = None
    alphas: Optional[List[float]] = None
    epsilons: Optional[List[float]] = None
    pointwise_tol: Optional[float] = None
    integral_tol: Optional[float] = None
    output_dir: Optional[str] = None
    dump_fields: Optional[bool] = None


@app.get("/api")
async def api_root():
    return {"message": "Half-Wave Maps Laboratory API", "version": "1.0.0"}


@app.get("/api/health")
async def health_check():
    return {"status": "healthy"}


@app.get("/api/subcommands")
async def list_subcommands():
    return {"subcommands": list(SUBCOMMANDS)}


@app.post("/api/run/{subcommand}")
def run(subcommand: str, request: Optional[RunRequest] = None):
    """Run one harness subcommand; the report is also written to its output directory."""
    if subcommand not in SUBCOMMANDS:
        raise HTTPException(status_code=404, detail=f"Unknown subcommand: {subcommand}")
    try:
        overrides = request.model_dump(exclude_none=True) if request else {}
        report = run_subcommand(subcommand, parse_config(overrides))
        return report.model_dump(by_alias=True)
    except (ConfigError, ParameterOutOfRange) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except HTTPException:
        raise
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error running {subcommand}: {str(e)}")
