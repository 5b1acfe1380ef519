method LastDigit(n: int) returns (d: int)
  requires n >= 0
  ensures 0 <= d && d < 10
  ensures (n - d) % 10 == 0
{
  return n % 10;
}
