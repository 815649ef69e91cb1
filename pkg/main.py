"""
Z/mZ 幂等元工具 - 主入口
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

# 加载环境变量（config.yaml 中的 ${IDEMPOTENT_*} 依赖它）
load_dotenv()

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import run


def main():
    """主函数"""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
