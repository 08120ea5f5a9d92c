"""
Start the laboratory API with uvicorn (HWMLAB_HOST / HWMLAB_PORT from .env)
"""
import os
import sys

import uvicorn

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from hwmlab.config import API_HOST, API_PORT, LOG_LEVEL

if __name__ == "__main__":
    print(f"✅ Serving hwmlab on http://{API_HOST}:{API_PORT}/api")
    uvicorn.run("hwmlab.main:app", host=API_HOST, port=API_PORT, reload=False, log_level=LOG_LEVEL.lower())
