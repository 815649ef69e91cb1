"""
输入解析模块
命令行中的模数、下标集合、范围与恒等式参数
"""

import json
import logging
import re
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from .arithmetic import DEFAULT_TRIAL_BOUND, FactoredModulus, factorize
from .errors import IdempotentError, ParseError
from .idempotents import IndexSet
from .identities import IdentityParams


logger = logging.getLogger(__name__)

_FACTOR_PATTERN = re.compile(r"^\s*(\d+)\s*(?:\^\s*(\d+))?\s*$")
_RANGE_PATTERN = re.compile(r"^\s*(\d+)\s*(?:(?:-|\.\.)\s*(\d+))?\s*$")


class ModulusParser:
    """模数与参数解析器"""

    @staticmethod
    def parse_modulus(text: str, trial_bound: int = DEFAULT_TRIAL_BOUND) -> FactoredModulus:
        """
        解析模数

        支持三种形式：十进制 "360"、分解形式 "2^3*3^2*5"、
        JSON {"m": "360", "factors": [["2","3"], ...]} 或 [[2,3],[3,2],[5,1]]

        Args:
            text: 输入文本
            trial_bound: 十进制输入的试除上界

        Returns:
            FactoredModulus
        """
        text = (text or "").strip()
        if not text:
            raise ParseError("模数输入为空")

        if text[0] in "{[":
            return ModulusParser._parse_json(text)
        if "^" in text or "*" in text:
            return ModulusParser._parse_factored(text)
        if text.isdigit():
            return factorize(int(text), trial_bound)

        raise ParseError(f"无法识别的模数格式: {text}")

    @staticmethod
    def _parse_factored(text: str) -> FactoredModulus:
        factors = []
        for part in text.split("*"):
            match = _FACTOR_PATTERN.match(part)
            if not match:
                raise ParseError(f"无法解析因子 '{part}'")
            p = int(match.group(1))
            e = int(match.group(2)) if match.group(2) else 1
            factors.append((p, e))
        return FactoredModulus.from_factors(factors)

    @staticmethod
    def _parse_json(text: str) -> FactoredModulus:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"JSON 解析失败: {e}") from e

        factors = data.get("factors") if isinstance(data, dict) else data
        if not isinstance(factors, list):
            raise ParseError("JSON 中缺少 factors 列表")

        try:
            modulus = FactoredModulus.from_factors((int(p), int(e)) for p, e in factors)
        except (TypeError, ValueError) as e:
            if isinstance(e, IdempotentError):
                raise
            raise ParseError(f"factors 格式错误: {factors}") from e

        if isinstance(data, dict) and "m" in data and int(data["m"]) != modulus.m:
            raise ParseError(f"m = {data['m']} 与分解乘积 {modulus.m} 不一致")
        return modulus

    @staticmethod
    def parse_indices(text: str) -> List[int]:
        """"1,2" / "{1,2}" / "{}" / "" -> 升序去重的下标列表"""
        body = (text or "").strip().strip("{}").strip()
        if not body:
            return []
        try:
            return sorted({int(part) for part in body.split(",") if part.strip()})
        except ValueError as e:
            raise ParseError(f"无法解析下标集合: {text}") from e

    @staticmethod
    def parse_index_set(text: str, width: int) -> IndexSet:
        return IndexSet.of(ModulusParser.parse_indices(text), width)

    @staticmethod
    def parse_families(text: str) -> List[List[int]]:
        """以 ';' 或 '|' 分隔的多个集合，如 "1;2,3" """
        parts = re.split(r"[;|]", text or "")
        return [ModulusParser.parse_indices(part) for part in parts]

    @staticmethod
    def parse_range(text: str) -> Tuple[int, int]:
        """"2-500" / "2..500" / "30" -> 闭区间"""
        match = _RANGE_PATTERN.match(text or "")
        if not match:
            raise ParseError(f"无法解析范围: {text}")
        low = int(match.group(1))
        high = int(match.group(2)) if match.group(2) else low
        if low < 2 or high < low:
            raise ParseError(f"范围必须满足 2 <= 下界 <= 上界: {text}")
        return low, high

    @staticmethod
    def parse_identity_params(tokens: Optional[List[str]]) -> IdentityParams:
        """
        解析恒等式参数

        接受 key=value 形式 (I=1,2 J=3 sets=1;2,3 k=2 n=1)，或单个 JSON 对象
        """
        tokens = tokens or []
        if len(tokens) == 1 and tokens[0].lstrip().startswith("{"):
            raw = ModulusParser.extract_json(tokens[0])
            if raw is None:
                raise ParseError(f"参数 JSON 无法解析: {tokens[0]}")
        else:
            raw = ModulusParser._key_values(tokens)

        try:
            return IdentityParams.model_validate(raw)
        except ValidationError as e:
            raise ParseError(f"恒等式参数无效: {e.errors()[0]['msg']}") from e

    @staticmethod
    def _key_values(tokens: List[str]) -> Dict[str, Any]:
        raw: Dict[str, Any] = {}
        for token in tokens:
            if "=" not in token:
                raise ParseError(f"参数应为 key=value 形式: {token}")
            key, value = (part.strip() for part in token.split("=", 1))
            if key in ("I", "J"):
                raw[key] = ModulusParser.parse_indices(value)
            elif key == "sets":
                raw[key] = ModulusParser.parse_families(value)
            elif key in ("k", "n"):
                if not re.fullmatch(r"-?\d+", value):
                    raise ParseError(f"{key} 必须为整数: {value}")
                raw[key] = int(value)
            else:
                raise ParseError(f"未知参数: {key}")
        return raw

    @staticmethod
    def extract_json(text: str) -> Optional[Dict]:
        """
        从文本中提取 JSON 对象（兼容 ``` 代码块包裹）

        Returns:
            解析后的字典，失败返回 None
        """
        text = text.strip()
        if text.startswith("```"):
            text = text.strip("`")
            if text.startswith("json"):
                text = text[4:]
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            logger.warning(f"无法解析 JSON: {text[:100]}")
            return None
        return data if isinstance(data, dict) else None
