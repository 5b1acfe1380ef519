method Interest(p: int) returns (q: int)
  requires p >= 0
  ensures 10 * q <= p * 11 && p * 11 < 10 * q + 10
{
  return p + p / 10;
}
