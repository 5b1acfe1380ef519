method Cube(x: int) returns (c: int)
  ensures c == x * x * x
{
  var sq := x * x;
  return sq * x;
}
