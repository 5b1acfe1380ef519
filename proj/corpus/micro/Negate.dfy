method Negate(x: int) returns (y: int)
  ensures x + y == 0
{
  return 0 - x;
}
