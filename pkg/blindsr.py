import sys
from pathlib import Path

# --------------------------------------------------------------------------
# 시스템 경로 설정 및 모듈 임포트
# --------------------------------------------------------------------------
project_root = Path(__file__).resolve().parent
sys.path.append(str(project_root))

from cli.app import main

if __name__ == "__main__":
    main()
