method SumOfSquares(a: int, b: int) returns (s: int)
  ensures s == a * a + b * b
{
  return a * a + b * b;
}
