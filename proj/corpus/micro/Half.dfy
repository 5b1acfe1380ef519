method Half(n: int) returns (h: int)
  requires n >= 0
  ensures 2 * h <= n && n < 2 * h + 2
{
  return n / 2;
}
