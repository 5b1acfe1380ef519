method Square(x: int) returns (s: int)
  ensures s == x * x
{
  return x * x;
}
