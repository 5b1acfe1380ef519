method Celsius(f: int) returns (c: int)
  ensures 9 * c <= 5 * (f - 32) && 5 * (f - 32) < 9 * c + 9
{
  return (f - 32) * 5 / 9;
}
