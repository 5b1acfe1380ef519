method Triple(x: int) returns (r: int)
  ensures r == 3 * x
{
  return x + 2 * x;
}
